void main() {
  int x;
  __CPROVER_assume(x >= 0 && x <= 5);
  while (x < 10) {
    x = x + 1;
  }
  assert(x == 10);
}
