void main() {
  int w = 0, x, y, z;
  __CPROVER_assume(x < 0 && x == y && y == z && x >= -10);
  while (1) {
    z = -y;
    y = -x;
    w++;
    x = w + x;
    if (w % 3 != 0) w = w / 3;
    if (x >= 10) x = y = z = 0;
    assert(x <= z + 3);
  }
}
