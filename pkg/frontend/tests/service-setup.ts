/** Spawns the real scheduling service (stub LLM mode) for the test run. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

const PORT = 8931;
export const BASE_URL = `http://127.0.0.1:${PORT}`;

async function waitForService(child: ChildProcess): Promise<void> {
  for (let i = 0; i < 100; i++) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}`);
    }
    try {
      const resp = await fetch(`${BASE_URL}/api/session/probe/history`);
      if (resp.status === 404 || resp.status === 200) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service did not come up within 20s");
}

export default async function setup(): Promise<() => Promise<void>> {
  const dataDir = mkdtempSync(join(tmpdir(), "whysched-ui-test-"));
  const fixtures = join(dataDir, "fixtures.tsv");
  writeFileSync(fixtures, "");
  const child = spawn(
    "python3",
    ["-m", "whysched.cli", "serve",
     "--data-dir", dataDir,
     "--listen", `127.0.0.1:${PORT}`,
     "--llm-mode", "stub",
     "--llm-fixtures", fixtures],
    { cwd: join(__dirname, "..", ".."), stdio: ["ignore", "pipe", "pipe"] },
  );
  let log = "";
  child.stdout?.on("data", (d) => { log += d; });
  child.stderr?.on("data", (d) => { log += d; });
  try {
    await waitForService(child);
  } catch (err) {
    child.kill();
    throw new Error(`${err}\nservice log:\n${log}`);
  }
  process.env.WHYSCHED_TEST_BASE = BASE_URL;
  return async () => {
    child.kill();
    await new Promise((r) => setTimeout(r, 300));
  };
}
