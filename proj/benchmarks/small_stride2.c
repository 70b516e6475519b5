void main() {
  i8 x = 0;
  while (x < 20) {
    x = x + 2;
  }
  assert(x <= 21);
}
