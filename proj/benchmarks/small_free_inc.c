void main() {
  u8 x = 0;
  while (__VERIFIER_nondet_int() != 0) {
    x = x + 1;
  }
  assert(x <= 255);
}
