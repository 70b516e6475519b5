void main() {
  unsigned i = 0;
  unsigned j = 0;
  while (i < 2) {
    j = 0;
    while (j < 3) {
      j = j + 1;
    }
    i = i + 1;
  }
  assert(i == 2);
}
