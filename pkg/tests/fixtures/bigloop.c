int nondet();
#define false 0;
int main() {
  for (i = 0; i < 1000000; i++);
  assert(false);
  return 0;
}
