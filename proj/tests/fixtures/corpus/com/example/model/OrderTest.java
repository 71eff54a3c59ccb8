package com.example.model;

import org.junit.jupiter.api.Test;

class OrderTest {
    @Test
    void totalOfTwoItems() {
        Order order = new Order();
        order.add(new Item("pen", 2));
        order.add(new Item("book", 10));
        if (order.size() > 1) {
            order.applyDiscount(0.1);
        }
        assertEquals(10.8, order.total(), 1e-9);
    }

    @Test
    void emptyOrderHasNoItems() {
        Order order = new Order();
        assertThrows(IllegalArgumentException.class, () -> order.remove("x"));
        assertTrue(order.isEmpty());
    }
}
