void main() {
  unsigned x = 0;
  while (x < 10) {
    x = x + 1;
    assert(x != 7);
  }
}
