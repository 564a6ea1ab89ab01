#include <cstdio>

int main() {
  std::puts("roomforge: commands not wired up yet");
  return 2;
}
