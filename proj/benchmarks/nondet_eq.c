void main() {
  int x = __VERIFIER_nondet_int();
  assert(x != 42);
}
