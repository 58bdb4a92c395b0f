// Placeholder CLI; replaced as the benchmark driver lands.
int main() { return 2; }
