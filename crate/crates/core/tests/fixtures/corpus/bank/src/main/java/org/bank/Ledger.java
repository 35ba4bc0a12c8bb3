package org.bank;

import java.math.BigDecimal;
import java.util.HashMap;
import java.util.Map;

public class Ledger {
    private final Map<String, Account> accounts = new HashMap<>();

    public Account open(String owner) {
        Account a = new Account(owner);
        accounts.put(owner, a);
        return a;
    }

    public BigDecimal total() {
        BigDecimal sum = BigDecimal.ZERO;
        for (Account a : accounts.values()) {
            sum = sum.add(a.getBalance());
        }
        return sum;
    }

    public void transfer(String from, String to, BigDecimal amount) throws InsufficientFundsException {
        Account source = accounts.get(from);
        Account target = accounts.get(to);
        source.withdraw(amount);
        target.deposit(amount);
    }
}
