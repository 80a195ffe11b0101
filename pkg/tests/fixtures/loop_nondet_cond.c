int nondet();
int main() {
  int i = 0;
  while (nondet() != 0) {
    i = 1;
  }
  return 0;
}
