void main() {
  unsigned s = 0;
  unsigned i = 0;
  unsigned j = 0;
  while (i < 2) {
    j = 0;
    while (j < 3) {
      s = s + 1;
      j = j + 1;
    }
    i = i + 1;
  }
  assert(s != 6);
}
