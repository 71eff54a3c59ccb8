public void test_case() {
    DefaultTableXYDataset id_1=new DefaultTableXYDataset();
    DefaultTableXYDataset id_2=new DefaultTableXYDataset();
    id_1.addSeries(createSeries1());
    id_2.addSeries(createSeries1());
}
