void main() {
  int x = __VERIFIER_nondet_int();
  while (x < 100) {
    x = x + 1;
  }
  assert(x >= 100);
}
