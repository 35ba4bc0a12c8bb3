package calc;

public abstract class Expr {
    public abstract double eval();

    static final class Num extends Expr {
        final double value;
        Num(double value) { this.value = value; }
        public double eval() { return value; }
    }

    static final class Bin extends Expr {
        final char op;
        final Expr left, right;

        Bin(char op, Expr left, Expr right) {
            this.op = op;
            this.left = left;
            this.right = right;
        }

        public double eval() {
            double a = left.eval(), b = right.eval();
            switch (op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                default: return a / b;
            }
        }
    }
}
