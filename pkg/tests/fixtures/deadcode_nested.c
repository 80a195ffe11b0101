int nondet();
int main() {
  int x = nondet();
  int y = 0;
  if (x >= 0) {
    if (x < 0) {
      y = 1;
    } else {
      y = 2;
    }
  } else {
    y = 3;
  }
  return 0;
}
