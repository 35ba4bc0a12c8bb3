package calc;

import java.util.ArrayList;
import java.util.List;

public class Lexer {
    private final String src;
    private int pos;

    public Lexer(String src) {
        this.src = src;
    }

    public List<Token> tokens() {
        List<Token> out = new ArrayList<>();
        while (pos < src.length()) {
            char c = src.charAt(pos);
            if (Character.isWhitespace(c)) {
                pos++;
            } else if (Character.isDigit(c)) {
                int start = pos;
                while (pos < src.length() && Character.isDigit(src.charAt(pos))) {
                    pos++;
                }
                out.add(new Token(Token.Type.NUMBER, src.substring(start, pos)));
            } else {
                out.add(new Token(single(c), String.valueOf(c)));
                pos++;
            }
        }
        out.add(new Token(Token.Type.END, ""));
        return out;
    }

    private static Token.Type single(char c) {
        switch (c) {
            case '+': return Token.Type.PLUS;
            case '-': return Token.Type.MINUS;
            case '*': return Token.Type.STAR;
            case '/': return Token.Type.SLASH;
            case '(': return Token.Type.LPAREN;
            case ')': return Token.Type.RPAREN;
            default: throw new IllegalStateException("unexpected " + c);
        }
    }
}
