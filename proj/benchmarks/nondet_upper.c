void main() {
  unsigned x = 0;
  while (__VERIFIER_nondet_int() != 0) {
    if (x < 50) {
      x = x + 1;
    } else {
      x = 0;
    }
  }
  assert(x <= 50);
}
