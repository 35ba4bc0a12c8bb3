package events;

import java.util.logging.Logger;

public class LoggingListener implements Listener<Event> {
    private static final Logger LOG = Logger.getLogger("events");
    private int seen;

    @Override
    public void onEvent(Event event) {
        seen++;
        LOG.info(event.topic() + " at " + event.timestamp());
    }

    public int seen() {
        return seen;
    }
}
