// Translated from labeled guarded commands.
// Declarations are hoisted here; the source text introduces each
// variable at its first use.
#include <assert.h>

static void swap(int *a, int *b) { int tmp = *a; *a = *b; *b = tmp; }

int gcd(int x, int y) {
    int z = 0;

S:  // x = x0 & y = y0
    z = 1;
    goto A;
A:  // gcd(x0, y0) = z*gcd(x, y)
    if (x == y) { z = z*x; goto H; }
    if (x > y) { goto B; }
    if (x < y) { swap(&x, &y); goto B; }
    assert(0);
B:  // A & x > y
    if (y == 1) { goto H; }
    if (y > 1) { goto E; }
    assert(0);
E:  // B & y > 1
    if (x % 2 == 0) { goto C; }
    if (x % 2 != 0) { goto D; }
    assert(0);
C:  // B & even(x)
    if (y % 2 == 0) { { int __t0 = x/2; int __t1 = y/2; int __t2 = 2*z; x = __t0; y = __t1; z = __t2; } goto B; }
    if (y % 2 != 0) { x = x/2; goto A; }
    assert(0);
D:  // B & odd(x)
    if (y % 2 == 0) { y = y/2; goto B; }
    if (y % 2 != 0) { x = x/2 - y/2; goto A; }
    assert(0);
H:  // gcd(x0, y0) = z
    return z;
}
