package logic;

public class Validator {
    public boolean isValid(String request) {
        return request != null && !request.isBlank();
    }
}
