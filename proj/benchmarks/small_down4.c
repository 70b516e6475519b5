void main() {
  i8 x = 100;
  while (x > -100) {
    x = x - 4;
  }
  assert(x >= -103);
}
