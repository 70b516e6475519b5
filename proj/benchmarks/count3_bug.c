void main() {
  unsigned x = 0;
  while (x < 3) {
    x = x + 1;
  }
  assert(x != 3);
}
