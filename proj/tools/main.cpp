#include <cstdio>

int main() {
  std::puts("zollfrei: command-line interface lands with the full build");
  return 2;
}
