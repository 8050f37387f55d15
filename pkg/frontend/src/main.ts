/** Bootstrap: one store, one API client, full re-render on every change.
 * The confirm dialog is the only path to an explanation. */

import { Api, ApiError } from "./api.js";
import { Store, applyAdopt, applyConfirmResult, applyNextSchedule,
         applyQueryError, applyQueryResponse, applyReject, applySession,
         dismissAlternative } from "./store.js";
import { renderApp, type Handlers } from "./view.js";

export function createApp(root: HTMLElement, api: Api): Store {
  const store = new Store();

  const guard = async (work: () => Promise<void>) => {
    store.patch({ busy: true });
    try {
      await work();
    } catch (err) {
      if (err instanceof ApiError) {
        store.set(applyQueryError(store.state, err.payload));
      } else {
        store.set(applyQueryError(store.state, {
          error: "network",
          message: `The service is unreachable: ${String(err)}`,
        }));
      }
    } finally {
      store.patch({ busy: false });
    }
  };

  const handlers: Handlers = {
    onSubmitQuery(text: string) {
      const sid = store.state.sessionId;
      if (!sid || store.state.pending) return;
      void guard(async () => {
        const resp = await api.submitQuery(sid, text);
        store.set(applyQueryResponse(store.state, text, resp));
      });
    },
    onConfirm() {
      const sid = store.state.sessionId;
      const pending = store.state.pending;
      if (!sid || !pending) return;
      void guard(async () => {
        const resp = await api.confirm(sid, pending.token, true);
        store.set(applyConfirmResult(store.state, resp));
      });
    },
    onReject() {
      const sid = store.state.sessionId;
      const pending = store.state.pending;
      if (!sid || !pending) return;
      void guard(async () => {
        await api.confirm(sid, pending.token, false);
        store.set(applyReject(store.state));
      });
    },
    onNextSchedule() {
      const sid = store.state.sessionId;
      if (!sid) return;
      void guard(async () => {
        const resp = await api.nextSchedule(sid);
        store.set(applyNextSchedule(store.state, resp));
      });
    },
    onAdoptAlternative() {
      const sid = store.state.sessionId;
      if (!sid) return;
      void guard(async () => {
        const resp = await api.adoptAlternative(sid);
        store.set(applyAdopt(store.state, resp));
      });
    },
    onDismissAlternative() {
      store.set(dismissAlternative(store.state));
    },
  };

  store.subscribe((state) => renderApp(root, state, handlers));
  void guard(async () => {
    const resp = await api.createSession();
    store.set(applySession(store.state, resp));
  });
  return store;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  createApp(document.getElementById("app") as HTMLElement, new Api());
}
