void main() {
  int x = 1;
  assert(x == 0);
}
