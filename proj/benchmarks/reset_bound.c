void main() {
  int x = 0;
  while (__VERIFIER_nondet_int() != 0) {
    if (x > 10) {
      x = 0;
    } else {
      x = x + 1;
    }
    assert(x <= 11);
  }
}
