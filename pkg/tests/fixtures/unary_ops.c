int main() {
  int a = -3;
  int b = !a;
  int c = !b;
  int d = -(a + 2);
  assert(c == 1);
  return 0;
}
