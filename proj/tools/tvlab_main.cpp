#include <cstdio>

int main() {
  std::puts("tvlab: experiment harness (under construction)");
  return 1;
}
