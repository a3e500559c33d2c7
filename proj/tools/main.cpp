// Placeholder; the CLI is implemented once the C API lands.
int main() { return 0; }
