void main() {
  u8 x = 17;
  while (x > 3) {
    x = x - 2;
  }
  assert(x <= 3);
}
