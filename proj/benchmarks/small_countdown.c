void main() {
  u8 x = 200;
  while (x > 0) {
    x = x - 1;
  }
  assert(x == 0);
}
