package gui;

import logic.Processor;

public class MainWindow {
    private final InputHandler input = new InputHandler(new Processor());

    public void show(String result) {
        System.out.println(result);
    }
}
