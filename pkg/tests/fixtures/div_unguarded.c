int nondet();
int main() {
  int d = nondet();
  int q = 100 / d;
  return 0;
}
