void main() {
  int x;
  __CPROVER_assume(x > 5);
  assert(x > 6);
}
