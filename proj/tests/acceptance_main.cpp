#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

namespace {

struct Criterion {
  const char* name;
  std::function<void()> run;
};

std::vector<Criterion>& registry() {
  static std::vector<Criterion> r;
  return r;
}

}  // namespace

int main() {
  int failed = 0;
  for (const Criterion& c : registry()) {
    try {
      c.run();
      std::printf("[PASS] %s\n", c.name);
    } catch (const std::exception& e) {
      std::printf("[FAIL] %s: %s\n", c.name, e.what());
      ++failed;
    } catch (...) {
      std::printf("[FAIL] %s: unknown exception\n", c.name);
      ++failed;
    }
  }
  std::printf("%zu criteria, %d failed\n", registry().size(), failed);
  return failed == 0 ? 0 : 1;
}
