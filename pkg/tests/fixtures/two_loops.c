int main() {
  int i = 0;
  int j = 0;
  while (i < 2) {
    i = i + 1;
  }
  while (j < 2) {
    j = j + 2;
  }
  assert(i + j == 4);
  return 0;
}
