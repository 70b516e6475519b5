void main() {
  int x = __VERIFIER_nondet_int();
  if (x > 0) {
    assert(x != 3);
  }
}
