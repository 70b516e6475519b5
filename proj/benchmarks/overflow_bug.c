void main() {
  i8 x = 120;
  while (x > 0) {
    x = x + 1;
  }
  assert(x >= 0);
}
