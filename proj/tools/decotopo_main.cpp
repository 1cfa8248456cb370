#include <cstdio>
int main() { std::puts("decotopo cli pending"); return 0; }
