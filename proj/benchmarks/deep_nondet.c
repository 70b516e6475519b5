void main() {
  unsigned x = 0;
  while (__VERIFIER_nondet_int() != 0) {
    x = x + 1;
  }
  assert(x < 5);
}
