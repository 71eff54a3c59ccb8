/** 
  * Confirm that the equals method can distinguish all the required fields.
  */
public void testEquals(){
    DefaultTableXYDataset d1=new DefaultTableXYDataset();
    DefaultTableXYDataset d2=new DefaultTableXYDataset();
    assertTrue(d1.equals(d2));
    assertTrue(d2.equals(d1));
    d1.addSeries(createSeries1());
    assertFalse(d1.equals(d2));
    d2.addSeries(createSeries1());
    assertTrue(d1.equals(d2));
}
