int nondet();
int main() {
  int i = 0;
  int hits = 0;
  while (i < 3) {
    if (nondet() > 0) {
      hits = hits + 1;
    } else {
      hits = hits;
    }
    i = i + 1;
  }
  return 0;
}
