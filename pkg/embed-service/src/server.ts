import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { createApp, type ServiceState } from "./app.js";
import { DEFAULT_MODEL, Embedder, MODELS, type ModelName } from "./embedder.js";

const argv = yargs(hideBin(process.argv))
  .option("model", {
    choices: Object.keys(MODELS) as ModelName[],
    default: DEFAULT_MODEL,
    describe: "embedding model to serve",
  })
  .option("port", {
    type: "number",
    default: 8476,
    describe: "TCP port to listen on (0 picks a free port)",
  })
  .strict()
  .parseSync();

const state: ServiceState = { embedder: new Embedder(argv.model), ready: false };
const app = createApp(state);

const server = app.listen(argv.port, () => {
  state.ready = true;
  const address = server.address();
  const port = address && typeof address === "object" ? address.port : argv.port;
  console.log(
    `embed-service listening on port ${port} ` +
      `(model ${state.embedder.model}, dim ${state.embedder.dim})`,
  );
});
