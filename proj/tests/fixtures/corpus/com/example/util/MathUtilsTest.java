package com.example.util;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class MathUtilsTest {
    @Test
    public void testGcd() {
        int a = 12;
        int b = 18;
        assertEquals(6, MathUtils.gcd(a, b));
    }

    @Test
    public void testGcdWithZero() {
        int a = 0;
        int b = 5;
        assertEquals(5, MathUtils.gcd(a, b));
    }

    @Test
    public void testFactorialLoop() {
        long total = 1;
        for (int i = 1; i <= 5; i++) {
            total = total * i;
        }
        assertEquals(MathUtils.factorial(5), total);
    }
}
