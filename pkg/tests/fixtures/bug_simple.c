int nondet();
int main() {
  int x = nondet();
  assert(x != 3);
  return 0;
}
