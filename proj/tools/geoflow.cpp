#include <cstdio>
int main() { puts("geoflow placeholder"); return 0; }
