package gui;

import logic.Processor;

public class InputHandler {
    private final Processor processor;

    public InputHandler(Processor processor) {
        this.processor = processor;
    }

    public String submit(String request) {
        return processor.process(request);
    }
}
