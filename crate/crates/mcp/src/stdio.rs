use std::io::{self, BufRead, Write};
use std::sync::Arc;

use parking_lot::Mutex;
use serde_json::Value;

use crate::server::{error_response, McpServer, PARSE_ERROR};

fn write_line<W: Write>(out: &Mutex<W>, message: &Value) -> io::Result<()> {
    let mut w = out.lock();
    serde_json::to_writer(&mut *w, message)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// Serves line-delimited JSON-RPC until `input` reaches end of file.
///
/// Responses and server notifications share `output`; each message is
/// written as one line.
pub fn serve<R, W>(server: &Arc<McpServer>, input: R, output: W) -> io::Result<()>
where
    R: BufRead,
    W: Write + Send + 'static,
{
    let out = Arc::new(Mutex::new(output));
    let sink = out.clone();
    let id = server.add_notifier(Arc::new(move |m: &Value| {
        let _ = write_line(&sink, m);
    }));
    let result = (|| {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let response = match serde_json::from_str::<Value>(&line) {
                Ok(message) => server.handle(&message),
                Err(e) => Some(error_response(Value::Null, PARSE_ERROR, &format!("parse error: {e}"))),
            };
            if let Some(r) = response {
                write_line(&out, &r)?;
            }
        }
        Ok(())
    })();
    server.remove_notifier(id);
    result
}
