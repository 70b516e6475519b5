void main() {
  unsigned x = 0;
  while (x < 10) {
    x = x + 2;
  }
  assert(x <= 11);
}
