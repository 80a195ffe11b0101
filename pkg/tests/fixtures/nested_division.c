int nondet();
int main() {
  int d = nondet();
  int q = 0;
  if (d != 0) {
    q = 10 / d;
  } else {
    q = 0;
  }
  assert(q <= 10);
  return 0;
}
