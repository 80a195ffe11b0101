int main() {
  int i = 0;
  int flag = 0;
  while (i <= 2) {
    if (i % 2 == 0) {
      flag = flag + 1;
    } else {
      ;
    }
    i++;
  }
  assert(flag == 2);
  return 0;
}
