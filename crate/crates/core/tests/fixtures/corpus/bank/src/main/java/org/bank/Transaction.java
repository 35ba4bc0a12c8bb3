package org.bank;

import java.math.BigDecimal;

public final class Transaction {
    public enum Kind { DEPOSIT, WITHDRAWAL }

    private final Kind kind;
    private final BigDecimal amount;

    public Transaction(Kind kind, BigDecimal amount) {
        this.kind = kind;
        this.amount = amount;
    }

    public Kind getKind() {
        return kind;
    }

    public BigDecimal signedAmount() {
        return kind == Kind.DEPOSIT ? amount : amount.negate();
    }
}
