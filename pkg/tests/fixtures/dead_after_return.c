int main() {
  int x = 0;
  return 0;
  x = 1;
  assert(x == 1);
}
