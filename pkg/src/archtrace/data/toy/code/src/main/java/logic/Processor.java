package logic;

public class Processor {
    private final Validator validator = new Validator();

    public String process(String request) {
        if (!validator.isValid(request)) {
            throw new IllegalArgumentException("invalid request");
        }
        return request.toUpperCase();
    }
}
