package chain;

class A extends B {
    int a() { return b() + 1; }
}
