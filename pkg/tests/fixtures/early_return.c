int nondet();
int main() {
  int x = nondet();
  if (x > 0) {
    return 0;
  } else {
    x = -1;
  }
  x = 5;
  return 0;
}
