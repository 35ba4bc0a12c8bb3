package events;

@FunctionalInterface
public interface Listener<E extends Event> {
    void onEvent(E event);
}
